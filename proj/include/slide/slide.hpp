#pragma once

#include "slide/complexity.hpp"
#include "slide/coupling_matrix.hpp"
#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/exact.hpp"
#include "slide/generators.hpp"
#include "slide/gibbs.hpp"
#include "slide/metrics.hpp"
#include "slide/numeric.hpp"
#include "slide/oracle.hpp"
#include "slide/parallel.hpp"
#include "slide/pseudo_likelihood.hpp"
#include "slide/reconstruct.hpp"
#include "slide/rng.hpp"
#include "slide/spectral.hpp"
#include "slide/splicing.hpp"
#include "slide/vote_ingest.hpp"
