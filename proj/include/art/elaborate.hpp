#pragma once
// Inserts conc/unfold/fold/pad annotations so that the program is physically
// well-typed. Annotations already present are kept and simulated.

#include "art/program.hpp"

namespace art {

Program elaborate(const Program& p);

}  // namespace art
