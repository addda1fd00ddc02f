#pragma once

// Planar snake-robot kinematics and gait toolkit built on a
// variable-length arc-chain joint model.

#include "arcsnake/arc_model.hpp"
#include "arcsnake/errors.hpp"
#include "arcsnake/io.hpp"
#include "arcsnake/locomotion_sim.hpp"
#include "arcsnake/obstacle_gait.hpp"
#include "arcsnake/segmentation_fit.hpp"
#include "arcsnake/self_check.hpp"
#include "arcsnake/serpenoid.hpp"
