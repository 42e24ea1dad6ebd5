# Errors, preset loading and file writers
