// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "smartmeter/core/errors.hpp"

namespace smartmeter::ingest {

#define SMARTMETER_DEFINE_ERROR(Name) \
    class Name : public Error {       \
    public:                           \
        using Error::Error;           \
    }

SMARTMETER_DEFINE_ERROR(DuplicateChipId);
SMARTMETER_DEFINE_ERROR(UnknownDevice);
SMARTMETER_DEFINE_ERROR(NotFound);
SMARTMETER_DEFINE_ERROR(UnknownUser);
SMARTMETER_DEFINE_ERROR(DuplicateUser);
SMARTMETER_DEFINE_ERROR(DeviceAlreadyClaimed);
SMARTMETER_DEFINE_ERROR(NonPositiveAmount);
SMARTMETER_DEFINE_ERROR(BadCredentials);
SMARTMETER_DEFINE_ERROR(Unauthorized);
SMARTMETER_DEFINE_ERROR(ValidationError);
SMARTMETER_DEFINE_ERROR(LedgerCorrupt);

#undef SMARTMETER_DEFINE_ERROR

} // namespace smartmeter::ingest
