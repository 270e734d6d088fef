#include <iostream>
#include <string>
#include <vector>

#include "maxhom/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return maxhom::dispatch(args, std::cout, std::cerr);
}
