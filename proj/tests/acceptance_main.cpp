#include <iostream>

#include "cvl/selftest.hpp"

int main() { return cvl::run_acceptance(std::cout) == 0 ? 0 : 1; }
