#ifndef SOCIALZONE_HPP
#define SOCIALZONE_HPP

#include "socialzone/core.hpp"
#include "socialzone/log.hpp"
#include "socialzone/ingest.hpp"
#include "socialzone/interaction.hpp"
#include "socialzone/kdtree.hpp"
#include "socialzone/lof.hpp"
#include "socialzone/convex_hull.hpp"
#include "socialzone/enclosing_ellipse.hpp"
#include "socialzone/geometry.hpp"
#include "socialzone/zone_model.hpp"
#include "socialzone/zonelearn.hpp"
#include "socialzone/dynamics.hpp"
#include "socialzone/qp.hpp"
#include "socialzone/controller.hpp"
#include "socialzone/kkt_check.hpp"
#include "socialzone/simulator.hpp"
#include "socialzone/scenarios.hpp"
#include "socialzone/plots.hpp"
#include "socialzone/pipeline.hpp"
#include "socialzone/cli.hpp"

#endif  // SOCIALZONE_HPP
