#pragma once

#include "octovisc/audits.hpp"
#include "octovisc/certificate.hpp"
#include "octovisc/errors.hpp"
#include "octovisc/io.hpp"
#include "octovisc/isaacs.hpp"
#include "octovisc/linalg.hpp"
#include "octovisc/octonion.hpp"
#include "octovisc/operator.hpp"
#include "octovisc/pipeline.hpp"
#include "octovisc/random.hpp"
#include "octovisc/singular.hpp"
#include "octovisc/spectral.hpp"
#include "octovisc/trilinear.hpp"
