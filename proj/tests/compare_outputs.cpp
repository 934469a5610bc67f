// Exit 0 when two output trees match (manifests compared without run-specific keys).

#include <iostream>

#include "kinlab/acceptance.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: compare_outputs <dir-a> <dir-b>\n";
    return 2;
  }
  const std::string diff = kinlab::acceptance::compare_output_trees(argv[1], argv[2]);
  if (!diff.empty()) {
    std::cerr << diff << '\n';
    return 1;
  }
  std::cout << "identical\n";
  return 0;
}
