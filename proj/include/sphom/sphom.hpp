#pragma once

#include "error.hpp"
#include "lattice.hpp"
#include "random.hpp"
#include "laurent.hpp"
#include "linalg.hpp"
#include "newton.hpp"
#include "binomial.hpp"
#include "polyhedral.hpp"
#include "standard_form.hpp"
#include "homotopy.hpp"
#include "bootstrap.hpp"
#include "parallel.hpp"
#include "tracker.hpp"
#include "driver.hpp"
#include "io.hpp"
