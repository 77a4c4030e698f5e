#include "vfckit/numeric.hpp"

#include <cstdio>

int main() {
    std::puts("vfckit placeholder");
    return 0;
}
