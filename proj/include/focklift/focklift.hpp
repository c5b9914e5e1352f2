#ifndef FOCKLIFT_FOCKLIFT_HPP
#define FOCKLIFT_FOCKLIFT_HPP

#include "focklift/errors.hpp"
#include "focklift/fock.hpp"
#include "focklift/operators.hpp"
#include "focklift/dilation.hpp"
#include "focklift/multianalytic.hpp"
#include "focklift/interpolation.hpp"
#include "focklift/json_io.hpp"
#include "focklift/random.hpp"
#include "focklift/sweep.hpp"

#endif // FOCKLIFT_FOCKLIFT_HPP
