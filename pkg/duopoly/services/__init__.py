# One module of plain functions per analysis
