# Distance-based structural bias harvested from prior runs
