#pragma once

#include <ostream>

namespace cvl {

// Runs the full acceptance suite, printing one PASS/FAIL line per criterion.
// Returns the number of failed criteria.
int run_acceptance(std::ostream& out);

}  // namespace cvl
