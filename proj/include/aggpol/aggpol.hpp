#ifndef AGGPOL_AGGPOL_HPP
#define AGGPOL_AGGPOL_HPP

// Umbrella header: the whole library in one include.

#include "aggpol/config.hpp"
#include "aggpol/csv.hpp"
#include "aggpol/drive.hpp"
#include "aggpol/dynamics.hpp"
#include "aggpol/errors.hpp"
#include "aggpol/fft.hpp"
#include "aggpol/fractional.hpp"
#include "aggpol/langevin.hpp"
#include "aggpol/media.hpp"
#include "aggpol/ode.hpp"
#include "aggpol/pearson.hpp"
#include "aggpol/rng.hpp"
#include "aggpol/special.hpp"
#include "aggpol/spectro.hpp"

#endif // AGGPOL_AGGPOL_HPP
