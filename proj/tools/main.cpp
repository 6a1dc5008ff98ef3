#include <cstdio>

int main() {
  std::puts("raceloop CLI placeholder");
  return 0;
}
