// Emit the partition figure for a few length ratios.

#include <cstdio>
#include <string>

#include "tjstab/svg.hpp"

int main() {
  using namespace tjstab;
  int k = 0;
  for (double L : {0.2, 0.5, 1.5}) {
    const PartitionConfig cfg = build_config(1.0, 0.4, L);
    const std::string path = "figure_" + std::to_string(k++) + ".svg";
    emit_geometry_svg(cfg, path);
    std::printf("wrote %s (L* = %.2f)\n", path.c_str(), L);
  }
  return 0;
}
