#pragma once

#include "qcorr/angle.hpp"
#include "qcorr/fine.hpp"
#include "qcorr/inequalities.hpp"
#include "qcorr/io.hpp"
#include "qcorr/lhv.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/optics.hpp"
#include "qcorr/prob.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/scenarios.hpp"
#include "qcorr/simplex.hpp"
#include "qcorr/spin.hpp"
#include "qcorr/tolerances.hpp"
