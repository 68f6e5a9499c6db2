class NumericError(RuntimeError):
    ''' Base class for failures of the numerical layer (exit code 2). '''


class SolverError(NumericError):
    ''' The linear program behind a certificate could not be solved. '''

    def __init__(self, problem, status, message):
        super().__init__(f"{problem}: solver status {status}: {message}")
        self.problem = problem
        self.status = status


class StateSpaceError(NumericError):
    ''' A density update left the state space, usually a misconfigured dt. '''


class CertificateConflict(NumericError):
    ''' Stability and instability were certified for the same scenario. '''
