# Population, fitness evaluation, selection and replacement
