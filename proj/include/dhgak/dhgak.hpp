#pragma once

#include "alignment.hpp"
#include "centrality.hpp"
#include "clustering.hpp"
#include "config.hpp"
#include "embedder.hpp"
#include "evaluation.hpp"
#include "graph.hpp"
#include "kernel.hpp"
#include "slicer.hpp"
#include "svm.hpp"
#include "tu_format.hpp"
