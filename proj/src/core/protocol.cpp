// SPDX-License-Identifier: Apache-2.0
#include "smartmeter/core/protocol.hpp"

#include "smartmeter/core/errors.hpp"

namespace smartmeter {

std::string_view to_string(IngestStatus status) {
    switch (status) {
    case IngestStatus::accept:
        return "accept";
    case IngestStatus::duplicate:
        return "duplicate";
    case IngestStatus::reject:
        return "reject";
    }
    return "reject";
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
    case RejectReason::none:
        return "none";
    case RejectReason::sequence_gap:
        return "sequence_gap";
    case RejectReason::unknown_device:
        return "unknown_device";
    case RejectReason::invalid_report:
        return "invalid_report";
    }
    return "none";
}

IngestStatus parse_ingest_status(std::string_view text) {
    for (auto s : {IngestStatus::accept, IngestStatus::duplicate, IngestStatus::reject}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw ParseError("unknown ingest status '" + std::string(text) + "'");
}

RejectReason parse_reject_reason(std::string_view text) {
    for (auto r : {RejectReason::none, RejectReason::sequence_gap, RejectReason::unknown_device,
                   RejectReason::invalid_report}) {
        if (to_string(r) == text) {
            return r;
        }
    }
    throw ParseError("unknown reject reason '" + std::string(text) + "'");
}

} // namespace smartmeter
