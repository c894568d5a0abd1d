#pragma once

#include <string>

#include "ensemble/harness.hpp"

namespace ens {

struct PresetContext {
  const PresetParams& params;
  std::uint64_t seed;
  int jobs;
  ArtifactWriter& out;
};

namespace detail {

/// Runs one named preset, writing its artifacts; returns the summary document.
Json dispatch_preset(const std::string& name, const PresetContext& ctx, RunResult& result);

}  // namespace detail
}  // namespace ens
