from .lsq import solve_ls, SingularSystemError
