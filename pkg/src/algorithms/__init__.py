# hBOA library: problems, models, bias and the optimizer
