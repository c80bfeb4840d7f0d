# Apps module initialization
