#pragma once

#include "ncpar/errors.hpp"
#include "ncpar/dense.hpp"
#include "ncpar/domain.hpp"
#include "ncpar/problem.hpp"
#include "ncpar/mesh.hpp"
#include "ncpar/assembly.hpp"
#include "ncpar/spectral.hpp"
#include "ncpar/galerkin.hpp"
#include "ncpar/estimates.hpp"
#include "ncpar/sharpness.hpp"
#include "ncpar/io.hpp"
#include "ncpar/config.hpp"
#include "ncpar/pipeline.hpp"
