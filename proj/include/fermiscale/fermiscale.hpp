#pragma once

#include "fermiscale/mesh.hpp"
#include "fermiscale/model.hpp"
#include "fermiscale/region.hpp"
#include "fermiscale/structfact.hpp"
#include "fermiscale/fluctent.hpp"
#include "fermiscale/response.hpp"
#include "fermiscale/scaling.hpp"
#include "fermiscale/experiment.hpp"
