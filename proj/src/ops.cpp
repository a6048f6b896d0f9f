// ops: filled in later
