#include <cstdio>

int main() {
  std::puts("corrlab: placeholder");
  return 0;
}
