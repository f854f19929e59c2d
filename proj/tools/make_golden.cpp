// Writes the frozen protocol byte vectors into a directory.

#include <fstream>
#include <iostream>

#include "ipt/golden.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ipt-make-golden DIR\n";
    return 2;
  }
  for (const auto& [name, bytes] : ipt::golden_vectors()) {
    std::ofstream out(std::string(argv[1]) + "/" + name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::cerr << "cannot write " << name << '\n';
      return 1;
    }
  }
  return 0;
}
