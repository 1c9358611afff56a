#pragma once

#include "cassinian.hpp"
#include "errors.hpp"
#include "gromov_delta.hpp"
#include "io.hpp"
#include "metric_core.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "scenarios.hpp"
#include "verify.hpp"
