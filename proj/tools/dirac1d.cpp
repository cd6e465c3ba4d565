#include <cstdio>
int main() { std::puts("dirac1d: CLI under construction"); return 1; }
