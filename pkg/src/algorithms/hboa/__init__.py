# hBOA optimisation loop
