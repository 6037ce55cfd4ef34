#pragma once

// Umbrella header for the granular bi-clustering library.

#include "gbc/bicluster.hpp"
#include "gbc/cheng_church.hpp"
#include "gbc/common.hpp"
#include "gbc/fcm.hpp"
#include "gbc/granulation.hpp"
#include "gbc/granules.hpp"
#include "gbc/io.hpp"
#include "gbc/jig.hpp"
#include "gbc/matrix.hpp"
#include "gbc/pipeline.hpp"
#include "gbc/pso.hpp"
#include "gbc/scoring.hpp"
#include "gbc/search.hpp"
#include "gbc/synthetic.hpp"
#include "gbc/trend.hpp"
