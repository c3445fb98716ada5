#pragma once

// Everything except the command layer.

#include "vlpr/classifier.hpp"
#include "vlpr/color.hpp"
#include "vlpr/components.hpp"
#include "vlpr/config.hpp"
#include "vlpr/corpus.hpp"
#include "vlpr/features.hpp"
#include "vlpr/font.hpp"
#include "vlpr/gatesim.hpp"
#include "vlpr/glyph.hpp"
#include "vlpr/image.hpp"
#include "vlpr/image_io.hpp"
#include "vlpr/inventory.hpp"
#include "vlpr/localization.hpp"
#include "vlpr/morphology.hpp"
#include "vlpr/pipeline.hpp"
#include "vlpr/platetype.hpp"
#include "vlpr/rotate.hpp"
#include "vlpr/segmentation.hpp"
#include "vlpr/synth.hpp"
#include "vlpr/threshold.hpp"
