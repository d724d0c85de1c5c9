#pragma once

#include "acquisition.hpp"
#include "aig.hpp"
#include "covariance.hpp"
#include "gp.hpp"
#include "harness.hpp"
#include "kernel.hpp"
#include "optimizer.hpp"
#include "oracle.hpp"
#include "passes.hpp"
#include "sequence.hpp"
#include "synthenv.hpp"
