#pragma once

// Everything except the command line (zoll/lab.hpp).

#include "zoll/circle.hpp"
#include "zoll/config.hpp"
#include "zoll/estimates.hpp"
#include "zoll/expsum.hpp"
#include "zoll/flow.hpp"
#include "zoll/parallel.hpp"
#include "zoll/report.hpp"
#include "zoll/runs/estimate_runs.hpp"
#include "zoll/runs/solver_runs.hpp"
#include "zoll/runs/sum_runs.hpp"
#include "zoll/runs/variation_runs.hpp"
#include "zoll/scaling.hpp"
#include "zoll/solver.hpp"
#include "zoll/sphere.hpp"
#include "zoll/trajectory_io.hpp"
#include "zoll/variation.hpp"
#include "zoll/zonal_io.hpp"
