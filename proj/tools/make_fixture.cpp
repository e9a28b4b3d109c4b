// Regenerates data/synthetic_panel.csv, the bundled six-decade monthly panel.
// Usage: make_fixture [seed] [path]

#include <cstdint>
#include <iostream>
#include <string>

#include "macrostate/error.hpp"
#include "macrostate/fixture.hpp"
#include "macrostate/panel.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 1960;
  std::string path = "data/synthetic_panel.csv";
  try {
    if (argc > 1) seed = std::stoull(argv[1]);
    if (argc > 2) path = argv[2];
    macrostate::save_panel_file(macrostate::synthetic_six_decade_panel(seed), path);
  } catch (const std::exception& e) {
    std::cerr << "make_fixture: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << path << " (seed " << seed << ")\n";
  return 0;
}
