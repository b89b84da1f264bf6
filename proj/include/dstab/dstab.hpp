#pragma once

#include "dstab/analysis.hpp"
#include "dstab/lmi.hpp"
#include "dstab/numerics.hpp"
#include "dstab/oracle.hpp"
#include "dstab/polymatrix.hpp"
#include "dstab/problem.hpp"
#include "dstab/regions.hpp"
#include "dstab/sdp.hpp"
#include "dstab/uncertainty.hpp"
