#pragma once

#include "fixlab/analysis.hpp"
#include "fixlab/anchor.hpp"
#include "fixlab/config.hpp"
#include "fixlab/engine.hpp"
#include "fixlab/operators.hpp"
#include "fixlab/reference.hpp"
#include "fixlab/rng.hpp"
#include "fixlab/schedules.hpp"
#include "fixlab/space.hpp"
#include "fixlab/suites.hpp"
#include "fixlab/validate.hpp"
