#ifndef SOCACT_SOCACT_HPP
#define SOCACT_SOCACT_HPP

#include "socact/analytics.hpp"
#include "socact/classified.hpp"
#include "socact/classify.hpp"
#include "socact/common.hpp"
#include "socact/explain.hpp"
#include "socact/geo.hpp"
#include "socact/ingest.hpp"
#include "socact/model_io.hpp"
#include "socact/report.hpp"
#include "socact/modes.hpp"
#include "socact/segment.hpp"
#include "socact/text.hpp"

#endif  // SOCACT_SOCACT_HPP
