// Build-only check that every public header compiles standalone under the
// project warning set.  Dropped once the full suites cover the surface.

#include "rigidem/charge_shape.hpp"
#include "rigidem/coupling.hpp"
#include "rigidem/diagnostics.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/evolution.hpp"
#include "rigidem/fft.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/initial_data.hpp"
#include "rigidem/io.hpp"
#include "rigidem/lienard_wiechert.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/rng.hpp"
#include "rigidem/runner.hpp"
#include "rigidem/scenario.hpp"
#include "rigidem/source.hpp"
#include "rigidem/spectral_deposit.hpp"
#include "rigidem/spectral_ops.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/vec3.hpp"
#include "rigidem/weights.hpp"

int main() { return 0; }
