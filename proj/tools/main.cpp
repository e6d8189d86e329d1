#include <cstdio>

int main() {
  std::puts("phytotron: CLI not wired up yet");
  return 1;
}
