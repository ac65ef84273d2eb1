// Acceptance gate: every check prints one pass/fail line; nonzero exit on
// any failure.

#include <iostream>

#include "groove/selfcheck.hpp"

int main() { return groove::selfcheck::run_all(std::cout) ? 0 : 1; }
