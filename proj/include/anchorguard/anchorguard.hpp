#pragma once

#include "anchorguard/attack.hpp"
#include "anchorguard/deployment.hpp"
#include "anchorguard/detection.hpp"
#include "anchorguard/errors.hpp"
#include "anchorguard/geometry.hpp"
#include "anchorguard/harness.hpp"
#include "anchorguard/mahalanobis.hpp"
#include "anchorguard/network_io.hpp"
#include "anchorguard/random.hpp"
#include "anchorguard/ranging.hpp"
