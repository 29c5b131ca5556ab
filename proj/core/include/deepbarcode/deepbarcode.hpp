#pragma once

#include "deepbarcode/binarizer.hpp"
#include "deepbarcode/error.hpp"
#include "deepbarcode/feature_store.hpp"
#include "deepbarcode/hamming_index.hpp"
#include "deepbarcode/metrics.hpp"
#include "deepbarcode/pca.hpp"
#include "deepbarcode/pipeline.hpp"
#include "deepbarcode/realvalue_index.hpp"
#include "deepbarcode/synthetic.hpp"
