# SPDX-FileCopyrightText: 2026-present cantorval contributors
#
# SPDX-License-Identifier: MIT
