#pragma once

#include "decsim/analysis.hpp"
#include "decsim/blocks.hpp"
#include "decsim/cli.hpp"
#include "decsim/model.hpp"
#include "decsim/simulate.hpp"
#include "decsim/stability.hpp"
#include "decsim/statespace.hpp"
#include "decsim/trajectory.hpp"
