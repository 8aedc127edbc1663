#ifndef GALILEO_GALILEO_HPP
#define GALILEO_GALILEO_HPP

#include "galileo/common.hpp"
#include "galileo/diagnostics/jacobian_audit.hpp"
#include "galileo/eval/bench_tree.hpp"
#include "galileo/eval/consistency.hpp"
#include "galileo/eval/metrics.hpp"
#include "galileo/filter/ieskf.hpp"
#include "galileo/io/dataset.hpp"
#include "galileo/io/frames.hpp"
#include "galileo/io/keyvalue.hpp"
#include "galileo/io/pipeline_config.hpp"
#include "galileo/io/tum.hpp"
#include "galileo/lie/se3.hpp"
#include "galileo/lie/sgal3.hpp"
#include "galileo/lie/so3.hpp"
#include "galileo/lio/initializer.hpp"
#include "galileo/lio/odometry.hpp"
#include "galileo/lio/plane.hpp"
#include "galileo/lio/runner.hpp"
#include "galileo/lio/scan.hpp"
#include "galileo/manifold/s2.hpp"
#include "galileo/map/baselines.hpp"
#include "galileo/map/ioctree.hpp"
#include "galileo/sim/rng.hpp"
#include "galileo/sim/sensors.hpp"
#include "galileo/sim/simulate.hpp"
#include "galileo/sim/trajectory.hpp"
#include "galileo/sim/world.hpp"
#include "galileo/state/nav_state.hpp"

#endif  // GALILEO_GALILEO_HPP
