#pragma once

#include "recon/boundary.hpp"
#include "recon/config.hpp"
#include "recon/contrastive.hpp"
#include "recon/errors.hpp"
#include "recon/harness.hpp"
#include "recon/io.hpp"
#include "recon/kmeans.hpp"
#include "recon/metrics.hpp"
#include "recon/pipeline.hpp"
#include "recon/rng.hpp"
#include "recon/signed_graph.hpp"
#include "recon/spectral.hpp"
#include "recon/ssbm.hpp"
#include "recon/structural.hpp"
