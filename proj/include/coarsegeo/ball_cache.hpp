#pragma once

#include <cstdint>
#include <string>

#include "coarsegeo/metric_graph.hpp"

namespace coarsegeo {

// Bumped whenever the on-disk layout or the ball construction changes.
inline constexpr std::uint32_t kBallFormatVersion = 1;
inline constexpr const char* kCacheDirEnv = "COARSEGEO_CACHE_DIR";

// $COARSEGEO_CACHE_DIR, else $XDG_CACHE_HOME/coarsegeo, else ~/.cache/coarsegeo.
std::string cache_dir();
std::string ball_cache_path(const GroupModel& model, int radius);

struct BallLoad {
  MetricGraph graph;
  bool from_cache = false;
  std::string path;
};

// Cached by (model hash, radius, format version). A stale or unreadable
// entry is rebuilt and overwritten; an unwritable cache directory is ignored.
BallLoad load_or_build_ball(const GroupModel& model, int radius, bool use_cache = true,
                            std::size_t max_vertices = MetricGraph::kDefaultVertexBudget);

}  // namespace coarsegeo
