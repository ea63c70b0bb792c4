#include "coarsegeo/ball_cache.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

namespace {

constexpr char kMagic[8] = {'C', 'G', 'B', 'A', 'L', 'L', '\0', '\0'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ResourceError("truncated ball file");
  return v;
}

template <class T>
void put_vec(std::ostream& out, const std::vector<T>& v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> get_vec(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw ResourceError("truncated ball file");
  return v;
}

}  // namespace

void MetricGraph::save(std::ostream& out) const {
  if (!exact_) throw PreconditionError("only unmodified Cayley balls can be cached");
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kBallFormatVersion);
  put<std::uint64_t>(out, model_->hash());
  put<std::int32_t>(out, radius_);
  put<std::uint64_t>(out, labels_.size());
  for (const auto& e : labels_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.syllables().size()));
    for (const auto& s : e.syllables()) {
      put<std::uint32_t>(out, s.factor);
      for (int k = 0; k < model_->factor_rank(s.factor); ++k) put<std::int32_t>(out, s.exps[k]);
    }
  }
  put_vec(out, depth_);
  put_vec(out, offsets_);
  put_vec(out, adj_);
  put_vec(out, letters_);
}

MetricGraph MetricGraph::load(std::istream& in, const GroupModel& model) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ResourceError("not a ball file");
  if (get<std::uint32_t>(in) != kBallFormatVersion) throw ResourceError("ball file version mismatch");
  if (get<std::uint64_t>(in) != model.hash()) throw ModelMismatchError("ball file was built for another model");
  MetricGraph g;
  g.model_ = std::make_shared<const GroupModel>(model);
  g.exact_ = true;
  g.radius_ = get<std::int32_t>(in);
  const auto n = get<std::uint64_t>(in);
  g.labels_.reserve(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    Element e = model.identity();
    const auto ns = get<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < ns; ++k) {
      const auto f = get<std::uint32_t>(in);
      if (f >= model.num_factors()) throw ResourceError("corrupt ball file");
      std::array<std::int32_t, kMaxFactorRank> ex{};
      for (int c = 0; c < model.factor_rank(f); ++c) ex[c] = get<std::int32_t>(in);
      e = model.multiply(e, model.factor_element(f, std::span<const std::int32_t>(ex.data(), model.factor_rank(f))));
    }
    g.labels_.push_back(std::move(e));
  }
  g.depth_ = get_vec<int>(in);
  g.offsets_ = get_vec<std::uint64_t>(in);
  g.adj_ = get_vec<VertexId>(in);
  g.letters_ = get_vec<Letter>(in);
  if (g.depth_.size() != n || g.offsets_.size() != n + 1 || g.adj_.size() != g.letters_.size() ||
      (n > 0 && g.offsets_.back() != g.adj_.size()))
    throw ResourceError("corrupt ball file");
  g.build_index();
  return g;
}

std::string cache_dir() {
  if (const char* d = std::getenv(kCacheDirEnv); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::string(x) + "/coarsegeo";
  if (const char* h = std::getenv("HOME"); h && *h) return std::string(h) + "/.cache/coarsegeo";
  return ".coarsegeo-cache";
}

std::string ball_cache_path(const GroupModel& model, int radius) {
  std::ostringstream os;
  os << cache_dir() << "/ball-" << std::hex << model.hash() << std::dec << "-r" << radius << "-v"
     << kBallFormatVersion << ".bin";
  return os.str();
}

BallLoad load_or_build_ball(const GroupModel& model, int radius, bool use_cache, std::size_t max_vertices) {
  BallLoad out{MetricGraph{}, false, ball_cache_path(model, radius)};
  if (use_cache) {
    std::ifstream in(out.path, std::ios::binary);
    if (in) {
      try {
        out.graph = MetricGraph::load(in, model);
        if (out.graph.radius() == radius) {
          out.from_cache = true;
          return out;
        }
      } catch (const Error&) {
        // fall through and rebuild
      }
    }
  }
  out.graph = MetricGraph::ball(model, radius, max_vertices);
  if (use_cache) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir(), ec);
    const std::string tmp = out.path + ".tmp";
    std::ofstream o(tmp, std::ios::binary);
    if (o) {
      out.graph.save(o);
      o.close();
      if (o) std::filesystem::rename(tmp, out.path, ec);
    }
  }
  return out;
}

}  // namespace coarsegeo
