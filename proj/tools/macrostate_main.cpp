#include <string>
#include <vector>

#include "macrostate/cli.hpp"

int main(int argc, char** argv) {
  return macrostate::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
