#include <cstdio>
int main() { std::puts("cwpir placeholder"); return 0; }
