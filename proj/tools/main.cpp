#include <cstdio>

int main() {
  std::puts("vocalface: CLI under construction");
  return 0;
}
