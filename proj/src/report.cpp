// report: filled in later
