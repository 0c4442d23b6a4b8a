#pragma once

#include <cstddef>
#include <vector>

#include "decsim/model.hpp"

namespace decsim {

// Uniformly sampled state history with the input sample at each time.
// All series have the same length; times are strictly increasing with a
// constant step.
struct Trajectory {
    std::vector<double> t;
    std::vector<State> x;
    std::vector<double> u;

    std::size_t size() const { return t.size(); }
};

}  // namespace decsim
